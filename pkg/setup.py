"""
Simulates the Wigner's friend bubble switching game and decides between
the observers' predictions with a sequential test
"""

import re
from pathlib import Path
from setuptools import setup



def get_version(package):
    "Return package version as listed in `__version__` in `init.py`"
    with open(str(Path(package, '__init__.py')), 'r', encoding='utf-8') as filehandle:
        initfile = filehandle.read()
    return re.search('__version__ = [\'"]([^\'"]+)[\'"]', initfile).group(1)


def get_long_description():
    "Return the README"
    with open('README.rst', 'r', encoding='utf-8') as filehandle:
        long_description = filehandle.read()
    return long_description


setup(
    name='bubbleswitch',
    version=get_version('bubbleswitch'),
    description='State-vector simulator of the Wigner\'s friend bubble switching game with sequential probability ratio test, prediction ledger and CSV, JSON and XML output',
    long_description=get_long_description(),
    classifiers=[
        # As from https://pypi.python.org/pypi?%3Aaction=list_classifiers
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Education',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    keywords=['quantum-foundations', 'wigners-friend', 'state-vector', 'sprt', 'simulation'],
    license='GPLv3+',
    packages=['bubbleswitch'],
    package_data={'bubbleswitch': ['settings.cfg']},
    include_package_data=True,
    python_requires='>=3.8',
    install_requires=[
        'lxml >= 4.6.4',
        'numpy >= 1.20',
    ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
    entry_points = {
        'console_scripts': [
            'bubbleswitch=bubbleswitch.cli:main',
        ],
    },
    tests_require=['pytest', 'hypothesis'],
    zip_safe=False,
)
