"""Lifelong reinforcement learning with sequential LTL tasks and reward machines."""

__version__ = "0.1.0"
