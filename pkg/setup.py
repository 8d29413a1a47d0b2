from setuptools import setup

from config import VERSION

setup(
    name='ciprecode',
    version=VERSION,
    description='Constructive-interference symbol-level precoding simulator',
    py_modules=['main', 'config', 'errors', 'orchestrator'],
    packages=['signals', 'analysis', 'precoders', 'validators', 'loaders', 'scenarios'],
    install_requires=[
        'numpy>=1.26.0',
        'scipy>=1.11.0',
        'pandas>=2.2.0',
        'pydantic>=2.5.0',
        'tqdm>=4.66.0',
        'python-dotenv>=1.0.0',
    ],
    entry_points={'console_scripts': ['ciprecode=main:main']},
    python_requires='>=3.9',
)
