# Empty __init__.py file for utils package
