"""ODE realization module"""
