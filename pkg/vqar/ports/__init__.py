"""
vqar ports package -- inbound adapters (CLI).
"""
