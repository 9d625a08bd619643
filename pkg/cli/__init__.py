"""Command line module"""
