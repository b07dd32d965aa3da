# Classification evaluation package initialization
