"""
Module core - Configuration, logging et exceptions
"""
