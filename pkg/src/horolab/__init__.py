"""horolab: numerical experiments with horocycles, Hecke operators, periods
and Heegner points on SL(2, Z)\\H."""

__version__ = "0.1.0"
