"""Unit tests for plankforge."""
