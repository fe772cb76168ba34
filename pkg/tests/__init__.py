# Tests package for opencarnot
