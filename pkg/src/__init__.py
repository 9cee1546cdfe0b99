"""Well-rounded lattices from monic integer polynomials"""
