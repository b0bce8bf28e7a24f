"""
partial-omt - Optimization Modulo Theories over linear arithmetic

A lazy CDCL(T) linear search that shrinks every total truth assignment
to a partial one before minimizing, so that each improvement step can
prune more of the search space.
"""

__version__ = "0.1.0"
