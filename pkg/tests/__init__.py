"""Test suite for plankforge."""
