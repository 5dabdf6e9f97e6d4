"""Independent oracles and property checks for the heat kernel engine."""
