# Empty __init__.py file for data package
