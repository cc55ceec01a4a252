"""
vqar adapters package -- outbound adapters (filesystem, SVG).
"""
