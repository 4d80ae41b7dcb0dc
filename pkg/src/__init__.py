# Cross-efficiency portfolio selection package
