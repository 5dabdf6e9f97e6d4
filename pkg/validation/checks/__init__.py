"""Single-purpose suite checks; each module exposes one ``check``."""
