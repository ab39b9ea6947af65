"""Integration tests for plankforge.

These run the CLI end to end at the full sample budget and are skipped by default.
Run with: pytest -m slow
"""
