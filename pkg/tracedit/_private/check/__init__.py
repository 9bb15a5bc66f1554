"""
Code for validating various user inputs.
"""
