"""Heat kernel evaluation: exact chain sums for the Dirac parametrix and
time quadrature of the Neumann series for any other."""
