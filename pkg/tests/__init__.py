"""Tests for the vehicular offloading simulator."""
