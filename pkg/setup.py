"""Legacy build shim -- ALL project metadata lives in pyproject.toml.

Kept so ``python setup.py bdist_wheel`` still works offline. Do not add
install_requires (or any other [project]-covered field) here.
"""
from setuptools import setup

setup()
