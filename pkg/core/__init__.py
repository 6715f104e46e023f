# Empty __init__.py file for core package
