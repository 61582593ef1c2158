"""Simulation and analysis of the four-state language-shift cellular automaton."""
