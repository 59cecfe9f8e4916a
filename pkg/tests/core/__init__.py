"""Tests for the numerical core."""
