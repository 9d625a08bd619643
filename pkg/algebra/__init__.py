"""Operator algebra: noncommutative polynomials, parsing, genericity and characteristic roots"""
