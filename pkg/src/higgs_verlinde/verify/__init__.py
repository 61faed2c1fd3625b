"""Closed-form oracles and the cross-path identity suite."""
