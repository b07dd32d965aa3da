from setuptools import find_packages, setup

# Read requirements from requirements.txt
with open('requirements.txt') as f:
    requirements = f.read().splitlines()

setup(
    name="nudge_bandit",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    install_requires=requirements,
    python_requires=">=3.10",
    entry_points={
        "console_scripts": [
            "nudgebandit=src.main:main",
        ],
    },
)
