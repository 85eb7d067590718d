# Group toolkit tests package
