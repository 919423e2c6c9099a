from setuptools import setup, find_packages

setup(
    name='ecdb',
    version='1.0.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=[
        'sympy',
        'mpmath',
        'numpy',
        'pandas',
        'matplotlib',
        'tabulate',
    ],
    entry_points={
        'console_scripts': [
            'ecdb = ecdb.ecdb_cli:main',
        ]
    },
)
