"""Effective rate of NOMA in underlay spectrum sharing."""
