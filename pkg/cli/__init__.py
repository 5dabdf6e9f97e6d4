"""Command-line front end: graph generation, kernel computation, validation
suites and route comparison."""
