"""
Scenario builders, one module per worked construction.
"""
