import os
import sys
sys.path.append(os.path.abspath('./'))
from setuptools import setup, find_packages

setup(name='spherejerk',
      version='0.1',
      description='Constrained minimum-jerk movements on a sphere',
      keywords='minimum jerk, motor learning, haptics, boundary value '
               'problem, movement smoothness',
      license='GLGP 3.0',
      platforms=['Linux', 'Windows'],
      packages=find_packages(exclude=['test']),
      include_package_data=True,
      install_requires=['matplotlib', 'numpy', 'pandas', 'psutil', 'scipy', 
                        'statsmodels',
                        ],
      entry_points={'console_scripts': 
                    ['spherejerk = spherejerk.cli:main']},
      classifiers=['Programming Language :: Python :: 3',
                   'Topic :: Scientific/Engineering',
                   'License :: OSI Approved :: GLGP 3.0 License']
      )
