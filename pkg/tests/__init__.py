﻿# Tests directory
