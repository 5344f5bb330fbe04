# stratscope test package
