"""Kernel numerics module"""
