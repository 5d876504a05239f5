"""Fast, isolated unit tests; statistical checks carry the ``slow`` marker."""
