"""Setup configuration for bnl-sampletime package."""
from setuptools import setup, find_packages

setup(
    name="bnl-sampletime",
    version="0.1.0",
    packages=find_packages(include=["src", "src.*"]),
    python_requires=">=3.10",
)
