"""Tests that run the optimal_cbf scenarios and command line end to end."""
