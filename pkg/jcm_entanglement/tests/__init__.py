"""
JCM Entanglement Test Module
"""
