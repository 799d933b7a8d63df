"""Equational graphs over prime fields."""
