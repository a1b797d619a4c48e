0.1
