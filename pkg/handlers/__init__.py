# Empty __init__.py file for handlers package
