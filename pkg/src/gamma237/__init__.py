"""Exact computations with the (2,3,7) triangle group lifted to the line.

Gamma = <a, b, c | a^2 = b^3 = c^7 = abc> acts on R through the central lift
of its Fuchsian representation, with abc acting as translation by 1.  The
package provides exact arithmetic in the trace field, the group and its
action, left-orders given by basepoints, finite dynamical realizations,
blow-ups, and a search for conjugators between orders.
"""
__version__ = "0.1.0"
