"""asuman-sim test package (not distributed)."""
