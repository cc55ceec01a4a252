"""
vqar Tests Package
"""
