"""
hahnlab - exact valuation theory over Hahn series fields of positive characteristic.
"""

__version__ = '0.3.0'
