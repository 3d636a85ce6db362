// placeholder, filled in module by module
