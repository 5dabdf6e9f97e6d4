"""Graph distances with certified lower bounds, ball volumes and the doubling check."""
