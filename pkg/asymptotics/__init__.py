"""Asymptotic diagonalization module"""
