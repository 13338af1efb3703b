from setuptools import setup, find_packages

version = '1.0.0'

setup(name='xyz-tradeoff',
      version=version,
      description='Entanglement and coherence trade-offs in a dephased '
                  'two-qubit XYZ spin model',
      license='Apache License 2.0',
      packages=find_packages(exclude=['test', 'test.*']),
      entry_points='''
        [console_scripts]
        xyz-tradeoff=xyz_tradeoff.cli:main
      ''',
      python_requires='>=3.6',
      install_requires = [
        'click>=7.0',
        'numpy>=1.17'
      ],
      tests_require = [
        'pytest',
        'coverage'
      ])
