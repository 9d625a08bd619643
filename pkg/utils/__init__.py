"""Utils module"""