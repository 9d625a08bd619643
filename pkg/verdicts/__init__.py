"""Verdicts and estimates module"""
