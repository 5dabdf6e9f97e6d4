"""Parametrices, closed-form reference kernels, Bessel functions and walk counts."""
