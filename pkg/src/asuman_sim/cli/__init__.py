"""Command-line interface: ``asuman-sim simulate | sweep | bounds | validate``."""
