"""
vqar core package -- estimation, transport, simulation, oracles.
"""
