# pinwheel scheduling package
